"""Atomic text-file writing shared by every emitter."""
from __future__ import annotations

import contextlib
import os


@contextlib.contextmanager
def atomic_writer(path, newline="\n"):
    """Write to ``path`` via a temp file and rename, so readers never see
    a half-written file and a failed write leaves nothing behind."""
    tmp = f"{path}.tmp"
    fh = open(tmp, "w", encoding="utf-8", newline=newline)
    try:
        with fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise
