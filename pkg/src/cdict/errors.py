"""Exception hierarchy shared by all cdict modules."""


class CdictError(Exception):
    """Base class for every error raised by the library."""


# core

class PathConflict(CdictError):
    """An intermediate key on a path holds a non-Node value."""

    def __init__(self, path, message=None):
        self.path = tuple(path)
        super().__init__(message or f"non-node value in the way at {list(self.path)!r}")


class TypeMismatch(CdictError, TypeError):
    pass


class DimensionMismatch(CdictError, ValueError):
    pass


class BadBin(CdictError, ValueError):
    pass


class NoSuchEntry(CdictError, KeyError):
    pass


class CycleError(CdictError, ValueError):
    """Inserting a Node would make it reachable from itself."""


# numio

class NonFinite(CdictError, ValueError):
    pass


class NumberSyntax(CdictError, ValueError):
    pass


class NumberOverflow(CdictError, OverflowError):
    pass


class OutOfRange(CdictError, OverflowError):
    pass


# json

class JSONSyntaxError(CdictError, ValueError):
    """Malformed JSON text; ``offset`` is the byte offset of the first bad byte."""

    def __init__(self, offset, reason="unexpected input"):
        self.offset = offset
        self.reason = reason
        self.chunk = None
        super().__init__(f"{reason} at byte {offset}")


class ModelError(CdictError, ValueError):
    """Valid JSON that cannot be represented as a Node."""

    chunk = None


class TopLevelNotObject(ModelError):
    pass


class UnsupportedArray(ModelError):
    pass


class UnsupportedValue(ModelError):
    """JSON null, which the value model has no tag for."""


class DepthExceeded(ModelError):
    pass


class DuplicateKey(ModelError):
    pass


class KeyCollision(CdictError, ValueError):
    """Two distinct keys of one Node render to the same JSON string."""


# merge

class MergeConflict(CdictError):
    def __init__(self, path, reason="conflict", chunk=None):
        self.path = tuple(path)
        self.reason = reason
        self.chunk = chunk
        super().__init__(self._message())

    def _message(self):
        where = "/" + "/".join(str(k) for k in self.path)
        msg = f"{self.reason} at {where}"
        if self.chunk is not None:
            msg = f"chunk {self.chunk}: {msg}"
        return msg

    def with_chunk(self, index):
        self.chunk = index
        self.args = (self._message(),)
        return self


__all__ = [name for name, obj in list(globals().items())
           if isinstance(obj, type) and issubclass(obj, CdictError)]
