"""Exception hierarchy shared across the arena."""


class ArenaError(Exception):
    """Base class for every error raised by this package."""


# --- game engine ---

class GameError(ArenaError):
    pass


class InvalidConfig(GameError):
    pass


class OutOfTurn(GameError):
    pass


class DuplicateDescription(GameError):
    pass


class EmptyText(GameError):
    pass


class IncompleteBallot(GameError):
    pass


class SelfVote(GameError):
    pass


class DeadTarget(GameError):
    pass


class UnknownPlayer(GameError):
    pass


# --- prompts / parsing / backends ---

class MissingPlaceholder(ArenaError):
    pass


class Unparseable(ArenaError):
    pass


class OutOfRange(ArenaError):
    pass


class BackendUnavailable(ArenaError):
    pass


# --- prover / verification pipeline ---

class ProverUnavailable(ArenaError):
    pass


class IncompleteRecord(ArenaError):
    pass


# --- similarity providers ---

class ProviderUnavailable(ArenaError):
    pass


# --- metrics ---

class EmptyRounds(ArenaError):
    pass


class MissingReference(ArenaError):
    pass


class NoQualifyingRound(ArenaError):
    pass


class EmptyInput(ArenaError):
    pass


# --- persistence / replay ---

class CorruptRecord(ArenaError):
    pass
