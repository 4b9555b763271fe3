"""Corpus layout on disk: one subdirectory per class, mask files inside."""

from __future__ import annotations

from dataclasses import dataclass
import hashlib
import logging
from pathlib import Path

from .errors import EmptyClass, NoClasses
from .raster import DEFAULT_THRESHOLD, read_mask

logger = logging.getLogger(__name__)

MASK_SUFFIXES = (".pgm", ".png")


@dataclass(frozen=True)
class Corpus:
    """Validated class directories with their readable mask files."""

    root: Path
    classes: tuple[tuple[str, tuple[Path, ...]], ...]
    manifest_checksum: str

    @property
    def class_names(self) -> list[str]:
        return [name for name, _ in self.classes]

    @property
    def total_files(self) -> int:
        return sum(len(paths) for _, paths in self.classes)

    def to_json_dict(self) -> dict:
        return {
            "root": str(self.root),
            "checksum": self.manifest_checksum,
            "classes": {
                name: [p.name for p in paths] for name, paths in self.classes
            },
        }


def ingest(root, threshold: int = DEFAULT_THRESHOLD) -> Corpus:
    """Build a corpus from a directory tree, skipping unreadable files.

    Every subdirectory of root is a class; files inside must parse as masks.
    Classes whose files are all unreadable raise EmptyClass; a root without
    class subdirectories raises NoClasses.
    """
    root = Path(root)
    subdirs = sorted(p for p in root.iterdir() if p.is_dir()) if root.is_dir() else []
    if not subdirs:
        raise NoClasses(f"{root}: no class subdirectories found")

    classes = []
    hasher = hashlib.sha256()
    for sub in subdirs:
        files = sorted(
            p for p in sub.iterdir() if p.is_file() and p.suffix.lower() in MASK_SUFFIXES
        )
        kept = []
        for path in files:
            try:
                read_mask(path, threshold)
            except Exception as exc:
                logger.warning("skipping unreadable mask %s: %s", path, exc)
                continue
            kept.append(path)
            hasher.update(f"{sub.name}/{path.name}:".encode())
            hasher.update(hashlib.sha256(path.read_bytes()).hexdigest().encode())
        if not kept:
            raise EmptyClass(f"class directory {sub} has no readable masks")
        classes.append((sub.name, tuple(kept)))
    return Corpus(
        root=root,
        classes=tuple(classes),
        manifest_checksum=hasher.hexdigest(),
    )
