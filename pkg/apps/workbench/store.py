"""Document persistence helpers for instance files and reports."""
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Union

import orjson

logger = logging.getLogger(__name__)


def dump_document(obj: Dict[str, Any]) -> str:
    """Canonical JSON text: two-space indent, trailing newline."""
    return orjson.dumps(obj, option=orjson.OPT_INDENT_2).decode() + "\n"


def read_bytes(path: Union[str, Path]) -> bytes:
    """Raw document bytes from a path, or from stdin when path is '-'. Decoding is left to the parser."""
    if str(path) == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as f:
        return f.read()


def read_document(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Read a JSON document.

    Args:
        path: Path to the document

    Returns:
        Parsed dict, or empty dict if the file doesn't exist
    """
    path_obj = Path(path)
    if not path_obj.exists():
        return {}
    with open(path_obj, "rb") as f:
        return orjson.loads(f.read())


def write_text(path: Optional[Union[str, Path]], text: str) -> None:
    """
    Write text to a file with fsync, or to stdout when path is None or '-'.

    Args:
        path: Destination file
        text: Content to persist
    """
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return

    path_obj = Path(path)
    path_obj.parent.mkdir(parents=True, exist_ok=True)
    try:
        with open(path_obj, "wb") as f:
            f.write(text.encode("utf-8"))
            f.flush()
            os.fsync(f.fileno())
    except IOError as e:
        logger.error(f"Failed to write {path}: {e}")
        raise
    logger.debug(f"Wrote {len(text)} bytes to {path}")


def write_document(path: Optional[Union[str, Path]], obj: Dict[str, Any]) -> None:
    write_text(path, dump_document(obj))
