"""
Custom exceptions for the optilik library
"""


class OptilikError(Exception):
    """Base exception for library errors"""
    pass


class InvalidInputError(OptilikError, ValueError):
    """Precondition violations on inputs"""
    pass


class DatasetError(InvalidInputError):
    """Unreadable or malformed dataset files"""
    pass


class SolverError(OptilikError):
    """Numerical failure or undefined result"""
    pass


class ConfigurationError(OptilikError):
    """Invalid experiment configuration"""
    pass
