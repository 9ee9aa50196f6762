"""
LatticeWire entry point

With arguments, runs one command and exits with its status. Without
arguments, starts the interactive shell.
"""

import shlex
import sys

from dotenv import load_dotenv

from core.app import LatticeWireApp
from core.commands import EXIT_OK, CommandProcessor
from terminal.input_handler import get_user_input
from terminal.ui import display_message, display_result, setup_logging


def shell(app, processor):
    """Read-eval loop over the command processor"""
    display_message("LatticeWire shell. Type 'help' for commands, 'exit' to quit.", "highlight")
    while True:
        try:
            line = get_user_input(commands=processor.command_names(),
                                  style_name=app.config.get('prompt_style', 'default'))
        except (EOFError, KeyboardInterrupt):
            break
        line = line.strip()
        if not line:
            continue
        if line.lower() in ('exit', 'quit'):
            break
        display_result(processor.process(line), processor.last_status)
    return EXIT_OK


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    load_dotenv()
    app = LatticeWireApp()
    setup_logging(app.config.get('log_level', 'INFO'))
    processor = CommandProcessor(app)

    if not argv:
        return shell(app, processor)

    command = " ".join(argv[:1] + [shlex.quote(arg) for arg in argv[1:]])
    display_result(processor.process(command), processor.last_status)
    return processor.last_status


if __name__ == "__main__":
    sys.exit(main())
