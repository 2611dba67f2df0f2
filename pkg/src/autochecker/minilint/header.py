"""Header normalisation for generated checkers.

Generated checkers often get the ``use`` block wrong (missing types, made-up
ones).  Everything before the first visitor block is replaced with the
template's header, which imports every type the backend offers.
"""

from __future__ import annotations

import re
from importlib import resources
from pathlib import Path

from ..errors import NormalizationError

_FIRST_VISITOR = re.compile(r"^[ \t]*on[ \t]+[A-Za-z_]", re.MULTILINE)


def split_header(source: str) -> tuple[str, str]:
    m = _FIRST_VISITOR.search(source)
    if m is None:
        raise NormalizationError("no visitor block found")
    return source[: m.start()], source[m.start():]


def normalize_header(source: str, template: str) -> str:
    header, _ = split_header(template)
    _, body = split_header(source)
    return header + body


def default_template() -> str:
    return resources.files("autochecker").joinpath("data/template.check").read_text(encoding="utf-8")


def load_template(path: str | Path | None = None) -> str:
    if path is None:
        return default_template()
    return Path(path).read_text(encoding="utf-8")
