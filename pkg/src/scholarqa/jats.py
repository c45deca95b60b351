"""Convert JATS-style XML abstract fragments to readable plain text.

CrossRef returns abstracts as XML fragments with unresolved namespace
prefixes (`jats:p`, `mml:math`, ...). Parsing is lenient: prefixes found
in the fragment are bound to a dummy namespace so the stdlib parser
accepts them, and tags are matched by local name only.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET

from .errors import MalformedXmlError

# Elements whose text is separated by newlines; everything else (italic,
# bold, sub/sup, inline math, ...) contributes bare text.
BLOCK_TAGS = frozenset({"abstract", "p", "title", "sec", "list-item"})

_TAG_PREFIX = re.compile(r"</?\s*([A-Za-z_][\w.-]*):")
_ATTR_PREFIX = re.compile(r"\s([A-Za-z_][\w.-]*):[A-Za-z_][\w.-]*\s*=")
_RESERVED_PREFIXES = {"xml", "xmlns"}
_WHITESPACE_RUN = re.compile(r"\s+")

_BREAK = object()  # marker separating block-level text runs


def _wrap_fragment(raw: str) -> str:
    prefixes = set(_TAG_PREFIX.findall(raw)) | set(_ATTR_PREFIX.findall(raw))
    prefixes -= _RESERVED_PREFIXES
    decls = "".join(f' xmlns:{p}="urn:x-fragment:{p}"' for p in sorted(prefixes))
    return f"<_fragment{decls}>{raw}</_fragment>"


def _local_name(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _collect(elem: ET.Element, pieces: list) -> None:
    is_block = _local_name(elem.tag) in BLOCK_TAGS
    if is_block:
        pieces.append(_BREAK)
    if elem.text:
        pieces.append(elem.text)
    for child in elem:
        _collect(child, pieces)
        if child.tail:
            pieces.append(child.tail)
    if is_block:
        pieces.append(_BREAK)


def jats_to_plain_text(fragment: str) -> str:
    """Strip tags, decode entities, and normalize whitespace.

    Block elements separate lines; whitespace runs collapse to single
    spaces within a line. The result never contains angle brackets (any
    that decode from entities or raw text are dropped as markup residue).

    Raises MalformedXmlError when the fragment cannot be parsed.
    """
    if not fragment or not fragment.strip():
        return ""
    try:
        root = ET.fromstring(_wrap_fragment(fragment))
    except ET.ParseError as exc:
        raise MalformedXmlError(f"unparseable abstract fragment: {exc}") from exc

    pieces: list = []
    _collect(root, pieces)

    lines: list[str] = []
    run: list[str] = []
    for piece in pieces + [_BREAK]:
        if piece is _BREAK:
            text = "".join(run).replace("<", "").replace(">", "")
            text = _WHITESPACE_RUN.sub(" ", text).strip()
            if text:
                lines.append(text)
            run = []
        else:
            run.append(piece)
    return "\n".join(lines)
