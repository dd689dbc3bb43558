"""Execution oracle: runs generated snippets against an instrumented mock
dataframe and reports which columns are read and which alter the output when
resampled."""

__version__ = "0.1.0"

PROTOCOL_VERSION = 1
