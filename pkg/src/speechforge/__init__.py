"""speechforge: persona-grounded synthetic speech-dialogue data pipeline."""

__version__ = "0.1.0"
