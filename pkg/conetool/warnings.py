import threading
import warnings

# -----------------------------------------------------------------------------
# Deduplicated runtime warnings (one per distinct key per process)
# -----------------------------------------------------------------------------

_CONETOOL_WARN_LOCK = threading.Lock()
_CONETOOL_WARN_SEEN = set()    # set[tuple]
_CONETOOL_WARN_ITEMS = []      # list of dicts (stable order)


class ConetoolWarning(RuntimeWarning):
    pass


class SpanHypothesisWarning(ConetoolWarning):
    """The pullback spaces of a product do not span the ambient space."""
    pass


class SamplingShortfallWarning(ConetoolWarning):
    """Rejection sampling found fewer interior points than requested."""
    pass


def warn_once(key, message, category=ConetoolWarning):
    """
    Emit ``message`` as a warning the first time ``key`` is seen.
    Still non-fatal; execution continues.
    """
    key = (category.__name__,) + tuple(key)

    with _CONETOOL_WARN_LOCK:
        if key in _CONETOOL_WARN_SEEN:
            return False

        _CONETOOL_WARN_SEEN.add(key)
        _CONETOOL_WARN_ITEMS.append({"category": category.__name__, "message": message})

    warnings.warn(f"[conetool warning] {message}", category, stacklevel=3)
    return True


def emitted_warnings():
    """Warnings emitted so far in this process, oldest first."""
    with _CONETOOL_WARN_LOCK:
        return list(_CONETOOL_WARN_ITEMS)


def reset_warnings():
    with _CONETOOL_WARN_LOCK:
        _CONETOOL_WARN_SEEN.clear()
        _CONETOOL_WARN_ITEMS.clear()
