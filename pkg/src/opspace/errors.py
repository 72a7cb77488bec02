"""Exception classes mapped to CLI exit codes.

Exit code convention: 2 usage/config, 3 unreadable or malformed input
files, 4 data-contract violations (ValueError is treated the same way),
1 anything unexpected.
"""


class OpspaceError(Exception):
    exit_code = 1


class ConfigError(OpspaceError):
    exit_code = 2


class InputError(OpspaceError):
    exit_code = 3
