"""
init all ersearch exceptions
"""
from .general import * # noqa
from .ranking import * # noqa
