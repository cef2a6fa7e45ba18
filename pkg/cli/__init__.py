"""
Command-line layer of the toolkit.
Contains the controller, the subcommand modules and the suite registry.
"""

from .app_controller import AppController
from .keys import CommandKeys, FormatKeys, StatusKeys, SuiteKeys

__all__ = ["AppController", "CommandKeys", "FormatKeys", "StatusKeys", "SuiteKeys"]
