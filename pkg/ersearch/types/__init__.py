"""
init all ersearch value objects
"""
from .common import Common # noqa
from .corpus import * # noqa
from .extraction import * # noqa
from .index import * # noqa
from .query import * # noqa
from .scoring import * # noqa
from .ranking import * # noqa
from .evaluation import * # noqa
from .collection import * # noqa
