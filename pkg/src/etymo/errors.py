"""Exception types shared across the engine."""


class EtymoError(Exception):
    """Base class for all engine errors."""


class NotFound(EtymoError):
    """A referenced document or node does not exist."""


class DuplicateId(EtymoError):
    """An id is being re-ingested with content that differs from the stored record."""


class SchemaError(EtymoError):
    """A record failed validation; carries the 1-based line number of the bad record."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class EmptyCorpus(EtymoError):
    """Lexicon construction was attempted over zero documents."""


class EmptyVector(EtymoError):
    """A document produced no in-lexicon tokens, so it has no vector."""


class ZeroNorm(EtymoError):
    """Cosine similarity was asked for a zero-norm vector."""


class IdMismatch(EtymoError):
    """Two artifacts that must cover the same document ids do not."""


class DuplicateNode(EtymoError):
    """A node being inserted is already present in the graph."""


class MissingDate(EtymoError):
    """A node has no publication date, so its edges cannot be oriented."""


class EmptyGraph(EtymoError):
    """Ranking was attempted on a graph with no nodes."""


class MissingPrerequisite(EtymoError):
    """A pipeline stage cannot run because an input artifact is missing."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"stage '{stage}': {message}")
        self.stage = stage


class StaleArtifact(EtymoError):
    """An input artifact on disk no longer matches the hash recorded when it
    was built, so running the stage would mix inconsistent generations."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"stage '{stage}': {message}")
        self.stage = stage
