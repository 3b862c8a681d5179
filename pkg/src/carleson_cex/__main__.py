"""``python -m carleson_cex`` runs the command-line interface."""
from .cli import main

main()
