from ersearch.classes.engine import ERSearch # noqa
