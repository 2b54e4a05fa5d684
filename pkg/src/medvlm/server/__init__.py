"""HTTP service exposing the model behind the chat-completions wire protocol."""

from medvlm.server.app import create_app

__all__ = ["create_app"]
