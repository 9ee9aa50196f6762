"""
Input handler module for LatticeWire
"""

from prompt_toolkit import PromptSession
from prompt_toolkit.completion import WordCompleter
from prompt_toolkit.history import InMemoryHistory
from prompt_toolkit.styles import Style

# Session history
history = InMemoryHistory()

PROMPT_STYLES = {
    'default': Style.from_dict({'prompt': '#00aa00 bold'}),
    'plain': Style.from_dict({}),
}

default_commands = ['exit']


def get_user_input(prompt="latticewire> ", commands=None, style_name='default'):
    """Get user input with command completion"""
    all_commands = default_commands + (commands or [])
    command_completer = WordCompleter(all_commands, ignore_case=True)

    session = PromptSession(
        history=history,
        completer=command_completer,
        style=PROMPT_STYLES.get(style_name, PROMPT_STYLES['default'])
    )

    return session.prompt(prompt)
