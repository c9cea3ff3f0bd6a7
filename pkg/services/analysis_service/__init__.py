"""Analysis Service - Error-model fitting, planning and fault-tolerance resources."""

__version__ = "1.0.0"
