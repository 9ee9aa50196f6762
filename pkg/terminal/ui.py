"""
Terminal UI module for LatticeWire
"""

import logging
import os

from rich.console import Console
from rich.logging import RichHandler
from rich.theme import Theme

# Define a custom theme
custom_theme = Theme({
    "info": "dim cyan",
    "warning": "magenta",
    "error": "bold red",
    "success": "green",
    "command": "yellow",
    "highlight": "bold cyan"
})

console = Console(theme=custom_theme)

STATUS_STYLES = {0: "success", 1: "warning", 2: "error", 3: "error"}


def setup_logging(level="INFO"):
    """Route library logging through the themed console"""
    level = os.environ.get("LATTICEWIRE_LOG_LEVEL", level).upper()
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, show_path=False, rich_tracebacks=True)],
        force=True,
    )
    return level


def display_message(message, style="info"):
    """Display a message with the specified style"""
    console.print(message, style=style, highlight=False, markup=False)


def display_result(message, status):
    """Display command output styled by its exit status"""
    if message:
        display_message(message, STATUS_STYLES.get(status, "info"))
