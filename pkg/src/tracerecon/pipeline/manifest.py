"""Stage 1: fragment collection into a typed-pointer manifest."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Callable, Iterable, Mapping

from ..adapters import Fragment


class NoFragmentsRecovered(Exception):
    code = "no_fragments_recovered"


@dataclass(frozen=True)
class FragmentPointer:
    fragment_id: str
    family: str
    actor_id: str | None
    principal_id: str | None
    well_formed: bool


class Manifest:
    """Pointers in source order; payload bodies are resolved on demand."""

    def __init__(self, fragments: Iterable[Fragment]):
        self._store: dict[str, Fragment] = {}
        pointers = []
        for fragment in fragments:
            fid = fragment.fragment_id
            if fid in self._store:
                # keep the duplicate but under a distinct key, flagged
                n = 1
                while f"{fid}#dup{n}" in self._store:
                    n += 1
                fragment = replace(fragment, fragment_id=f"{fid}#dup{n}", well_formed=False)
                fid = fragment.fragment_id
            self._store[fid] = fragment
            pointers.append(
                FragmentPointer(
                    fid, fragment.family, fragment.actor_id, fragment.principal_id,
                    fragment.well_formed,
                )
            )
        self.pointers: tuple[FragmentPointer, ...] = tuple(pointers)
        self.resolutions = 0

    def __len__(self) -> int:
        return len(self.pointers)

    def __iter__(self):
        return iter(self.pointers)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(p.fragment_id for p in self.pointers)

    @property
    def flagged(self) -> tuple[str, ...]:
        return tuple(p.fragment_id for p in self.pointers if not p.well_formed)

    def resolve(self, fragment_id: str) -> Fragment:
        self.resolutions += 1
        return self._store[fragment_id]

    def payload(self, fragment_id: str) -> Mapping[str, Any]:
        return self.resolve(fragment_id).payload

    def lazy(self, fragment_id: str) -> Callable[[], Fragment]:
        return lambda: self.resolve(fragment_id)


def collect_fragments(fragments: Iterable[Fragment]) -> Manifest:
    manifest = Manifest(fragments)
    if not len(manifest):
        raise NoFragmentsRecovered("manifest is empty")
    return manifest
