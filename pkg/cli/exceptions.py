"""
Custom exceptions for the optilik command line
"""

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


class CLIError(Exception):
    """Base exception for CLI errors"""
    exit_code = EXIT_FAILURE


class UsageError(CLIError):
    """Bad flags or arguments; the message carries the usage text"""
    exit_code = EXIT_USAGE
