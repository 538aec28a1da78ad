"""Certificate cache.

One JSON file per block section keyed by (p, n, r) plus per-spec assembled
certificates.  The cache is advisory: deleting it never changes verdicts,
only how long the next section construction takes.  Loads are re-verified in
sampled mode as a cheap tamper check.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import VerificationFailed
from .groups import PGroupSpec
from .splitting import SectionCertificate, verify_section


def _spec_slug(spec: PGroupSpec) -> str:
    body = "-".join(f"b{n}x{r}" for n, r in spec.blocks)
    return f"spec-p{spec.p}-{body}"


class CertificateCache:
    def __init__(self, directory):
        self.directory = Path(directory)

    def _block_path(self, p: int, n: int, r: int) -> Path:
        return self.directory / f"block-p{p}-n{n}-r{r}.json"

    def _spec_path(self, spec: PGroupSpec) -> Path:
        return self.directory / f"{_spec_slug(spec)}.json"

    def load_block(self, p: int, n: int, r: int,
                   recheck: bool = True) -> SectionCertificate | None:
        path = self._block_path(p, n, r)
        if not path.exists():
            return None
        cert = SectionCertificate.from_json(json.loads(path.read_text()))
        if recheck:
            verify_section(cert, mode="sampled", sample_pairs=256)
        return cert

    def store_block(self, p: int, n: int, r: int,
                    cert: SectionCertificate) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self._block_path(p, n, r)
        path.write_text(json.dumps(cert.to_json(), sort_keys=True, indent=1))
        return path

    def load_spec(self, spec: PGroupSpec,
                  recheck: bool = True) -> SectionCertificate | None:
        path = self._spec_path(spec)
        if not path.exists():
            return None
        cert = SectionCertificate.from_json(json.loads(path.read_text()))
        if recheck:
            verify_section(cert, mode="sampled", sample_pairs=256)
        return cert

    def store_spec(self, cert: SectionCertificate) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self._spec_path(cert.spec)
        path.write_text(json.dumps(cert.to_json(), sort_keys=True, indent=1))
        return path

    def entries(self) -> list[Path]:
        if not self.directory.exists():
            return []
        return sorted(self.directory.glob("*.json"))

    def verify_all(self) -> list[tuple[str, bool, str]]:
        """Re-verify every cached certificate; (name, ok, detail) rows."""
        rows = []
        for path in self.entries():
            try:
                cert = SectionCertificate.from_json(json.loads(path.read_text()))
                report = verify_section(cert, mode="sampled", sample_pairs=512)
                rows.append((path.name, True, f"{report.pairs_checked} pairs"))
            except (VerificationFailed, ValueError, KeyError) as exc:
                rows.append((path.name, False, str(exc)))
        return rows

    def clear(self) -> int:
        count = 0
        for path in self.entries():
            path.unlink()
            count += 1
        return count
