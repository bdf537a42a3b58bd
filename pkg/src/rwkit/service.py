"""Human-in-the-loop correction service for pretagged paragraphs.

State lives in an append-only JSONL log; the in-memory index of latest
versions is rebuilt by replaying the log on startup, so a crash loses at most
a partially written line. Writes go through optimistic versioning: a client
must name the version it based its edit on, and a stale base is rejected with
a conflict rather than silently overwritten. Corrections that violate the
annotation schema are rejected outright.
"""

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from rwkit import dataio
from rwkit.metrics import cohens_kappa
from rwkit.schema import (
    LabeledParagraph,
    Paragraph,
    to_bio,
    validate,
)


def paragraph_key(p: Paragraph) -> str:
    return f"{p.paper_id or '?'}/{p.index if p.index is not None else 0}"


def placeholder_pretag(p: Paragraph) -> LabeledParagraph:
    """Fallback when no tagger is available: everything unmarked."""
    return LabeledParagraph(
        paragraph=p,
        sentence_labels=["other"] * len(p.sentences),
        spans=[],
        pretag_unavailable=True,
    )


@dataclass
class CorrectionStore:
    directory: Path
    paragraphs: dict[str, Paragraph] = field(default_factory=dict)
    pretags: dict[str, dict] = field(default_factory=dict)
    model: object | None = None
    latest: dict[str, dict] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)

    @classmethod
    def open(
        cls,
        directory: str | Path,
        paragraphs: list[Paragraph],
        pretagged: dict[str, LabeledParagraph] | None = None,
        model=None,
    ) -> "CorrectionStore":
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        store = cls(directory=directory, model=model)
        for p in paragraphs:
            store.paragraphs[paragraph_key(p)] = p
        for key, lp in (pretagged or {}).items():
            store.pretags[key] = dataio.labeled_to_dict(lp)
        store._replay()
        return store

    @property
    def log_path(self) -> Path:
        return self.directory / "log.jsonl"

    def _replay(self) -> None:
        if not self.log_path.exists():
            return
        with open(self.log_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                entry = json.loads(line)
                self.latest[entry["paragraph_id"]] = entry

    def version_of(self, pid: str) -> int:
        entry = self.latest.get(pid)
        return entry["version"] if entry else 0

    def pretag(self, pid: str) -> dict:
        """Version-0 state of a paragraph: a cached model tag, or an explicit
        placeholder marked pretag_unavailable when no model is loaded.
        """
        if pid not in self.pretags:
            p = self.paragraphs[pid]
            if self.model is not None:
                lp = self.model.predict(p)
            else:
                lp = placeholder_pretag(p)
            self.pretags[pid] = dataio.labeled_to_dict(lp)
        return self.pretags[pid]

    def current(self, pid: str) -> tuple[dict, int]:
        entry = self.latest.get(pid)
        if entry:
            return entry["labeled"], entry["version"]
        return self.pretag(pid), 0

    def next_uncorrected(self) -> str | None:
        for pid in sorted(self.paragraphs):
            if pid not in self.latest:
                return pid
        return None

    def put(
        self, pid: str, annotator: str, base_version: int, labeled: dict
    ) -> tuple[int, list]:
        """Returns (new_version, violations). A non-empty violation list or a
        stale base means nothing was written.
        """
        if pid not in self.paragraphs:
            raise KeyError(pid)
        try:
            lp = dataio.labeled_from_dict(labeled)
        except KeyError as exc:
            # distinguish a malformed body from an unknown paragraph id
            raise ValueError(f"malformed correction: missing field {exc}") from exc
        if lp.paragraph.text != self.paragraphs[pid].text:
            return 0, [
                {
                    "rule": "paragraph_mismatch",
                    "message": "correction text differs from the stored paragraph",
                    "span_index": None,
                }
            ]
        problems = validate(lp)
        if problems:
            return 0, [
                {"rule": v.rule, "message": v.message, "span_index": v.span_index}
                for v in problems
            ]
        with self.lock:
            current = self.version_of(pid)
            if base_version != current:
                return -current, []
            entry = {
                "paragraph_id": pid,
                "annotator": annotator,
                "version": current + 1,
                "labeled": dataio.labeled_to_dict(lp),
                "ts": round(time.time(), 3),
            }
            with open(self.log_path, "a", encoding="utf-8") as fh:
                fh.write(dataio.canonical_json(entry) + "\n")
            self.latest[pid] = entry
            return entry["version"], []

    def export(self, annotator: str | None = None) -> str:
        """Latest correction per paragraph as canonical JSONL, sorted by
        paragraph id; byte-identical across repeated calls on the same state.
        """
        lines = []
        for pid in sorted(self.latest):
            entry = self.latest[pid]
            if annotator and entry["annotator"] != annotator:
                continue
            lines.append(
                dataio.canonical_json(
                    {
                        "paragraph_id": pid,
                        "version": entry["version"],
                        "annotator": entry["annotator"],
                        "labeled": entry["labeled"],
                    }
                )
            )
        return "\n".join(lines) + ("\n" if lines else "")

    def agreement(self, annotator_a: str, annotator_b: str) -> dict:
        """Chance-corrected agreement over paragraphs both annotators
        corrected, from each annotator's latest version.
        """
        per_annotator: dict[str, dict[str, dict]] = {annotator_a: {}, annotator_b: {}}
        with open(self.log_path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                entry = json.loads(line)
                if entry["annotator"] in per_annotator:
                    per_annotator[entry["annotator"]][entry["paragraph_id"]] = entry
        shared = sorted(
            set(per_annotator[annotator_a]) & set(per_annotator[annotator_b])
        )
        disc_a, disc_b, cs_a, cs_b, ct_a, ct_b = [], [], [], [], [], []
        for pid in shared:
            lp_a = dataio.labeled_from_dict(per_annotator[annotator_a][pid]["labeled"])
            lp_b = dataio.labeled_from_dict(per_annotator[annotator_b][pid]["labeled"])
            tags_a, tags_b = to_bio(lp_a), to_bio(lp_b)
            disc_a += lp_a.sentence_labels
            disc_b += lp_b.sentence_labels
            cs_a += tags_a.cs_tags
            cs_b += tags_b.cs_tags
            ct_a += tags_a.ct_tags
            ct_b += tags_b.ct_tags
        if not shared:
            return {"paragraphs": 0}
        return {
            "paragraphs": len(shared),
            "kappa_disc": cohens_kappa(disc_a, disc_b),
            "kappa_cs": cohens_kappa(cs_a, cs_b),
            "kappa_ct": cohens_kappa(ct_a, ct_b),
        }


def create_app(store: CorrectionStore):
    from fastapi import FastAPI, HTTPException
    from fastapi.middleware.cors import CORSMiddleware
    from fastapi.responses import PlainTextResponse
    from pydantic import BaseModel

    class SessionIn(BaseModel):
        annotator: str

    class CorrectionIn(BaseModel):
        session_id: str
        base_version: int
        labeled: dict

    app = FastAPI(title="related-work correction service")
    # the review UI is typically served from another local port
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    sessions: dict[str, str] = {}

    def annotator_of(session_id: str) -> str:
        if session_id not in sessions:
            raise HTTPException(status_code=401, detail="unknown session")
        return sessions[session_id]

    @app.post("/sessions")
    def create_session(body: SessionIn):
        if not body.annotator.strip():
            raise HTTPException(status_code=422, detail="empty annotator name")
        session_id = uuid.uuid4().hex
        sessions[session_id] = body.annotator.strip()
        return {"session_id": session_id, "annotator": sessions[session_id]}

    @app.get("/items/next")
    def next_item(session_id: str):
        annotator_of(session_id)
        pid = store.next_uncorrected()
        if pid is None:
            return {"done": True}
        labeled, version = store.current(pid)
        return {
            "done": False,
            "paragraph_id": pid,
            "version": version,
            "labeled": labeled,
        }

    @app.get("/items/{pid:path}")
    def get_item(pid: str):
        if pid not in store.paragraphs:
            raise HTTPException(status_code=404, detail=f"unknown paragraph {pid}")
        labeled, version = store.current(pid)
        return {"paragraph_id": pid, "version": version, "labeled": labeled}

    @app.put("/items/{pid:path}")
    def put_item(pid: str, body: CorrectionIn):
        annotator = annotator_of(body.session_id)
        try:
            version, problems = store.put(
                pid, annotator, body.base_version, body.labeled
            )
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown paragraph {pid}")
        except (ValueError, TypeError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        if problems:
            raise HTTPException(
                status_code=422, detail={"violations": problems}
            )
        if version <= 0:
            raise HTTPException(
                status_code=409,
                detail={"current_version": -version, "base_version": body.base_version},
            )
        return {"paragraph_id": pid, "version": version}

    @app.get("/export", response_class=PlainTextResponse)
    def export(annotator: str | None = None):
        return PlainTextResponse(
            store.export(annotator), media_type="application/x-ndjson"
        )

    @app.get("/agreement")
    def agreement(a: str, b: str):
        return store.agreement(a, b)

    @app.get("/health")
    def health():
        return {"ok": True, "paragraphs": len(store.paragraphs)}

    return app
