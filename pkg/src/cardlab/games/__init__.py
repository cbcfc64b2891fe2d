"""Game engines. Importing this package registers every engine."""

from cardlab.games import doudizhu, gin_rummy, guandan, poker, uno  # noqa: F401
