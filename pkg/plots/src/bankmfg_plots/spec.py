"""Figure specifications built from a solver run manifest.

The solver's ``figure`` command maintains a flat key=value manifest mapping
``<tag>.<output>`` to CSV paths (relative to the manifest's directory).  A
FigureSpec collects, for one tag, the named input files plus the output
image path; construction verifies that every referenced CSV exists.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

KNOWN_TAGS = ("F1", "F2", "F3", "F4", "F5", "F6", "F7", "F8", "F9")


@dataclass(frozen=True)
class FigureSpec:
    tag: str
    inputs: dict  # output name -> Path of the CSV
    output: Path  # image file to write

    def __post_init__(self) -> None:
        if self.tag not in KNOWN_TAGS:
            raise ValueError(f"unknown figure tag {self.tag!r}; expected one of {KNOWN_TAGS}")
        if not self.inputs:
            raise ValueError(f"figure {self.tag} has no input files in the manifest")
        for name, path in self.inputs.items():
            if not Path(path).is_file():
                raise FileNotFoundError(f"figure {self.tag} input {name!r}: missing file {path}")


def read_manifest(path: str | Path) -> dict:
    out = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#") or "=" not in line:
            continue
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def specs_from_manifest(
    manifest_path: str | Path, out_dir: str | Path, figures: list[str] | None = None
) -> list[FigureSpec]:
    """One FigureSpec per requested tag (default: every tag in the manifest)."""
    manifest_path = Path(manifest_path)
    root = manifest_path.parent
    entries = read_manifest(manifest_path)
    by_tag: dict = {}
    for key, rel in entries.items():
        if "." not in key:
            continue
        tag, name = key.split(".", 1)
        if tag in KNOWN_TAGS:
            by_tag.setdefault(tag, {})[name] = root / rel
    wanted = figures if figures is not None else sorted(by_tag)
    specs = []
    for tag in wanted:
        tag = tag.strip().upper()
        if tag not in by_tag:
            raise KeyError(f"manifest {manifest_path} has no entries for figure {tag}")
        specs.append(FigureSpec(tag=tag, inputs=by_tag[tag],
                                output=Path(out_dir) / f"{tag}.png"))
    return specs
