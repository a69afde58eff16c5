"""HTTP JSON service and command-line front end over one shared store file."""

from .state import AppState
from .service import serve
from .cli import main

__all__ = ["AppState", "serve", "main"]
