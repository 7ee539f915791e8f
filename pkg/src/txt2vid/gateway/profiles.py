"""Persistent profile store.

Driving-video blobs are content-addressed (sha256) so a sender re-registering
the same video across calls costs one file, and an index maps user ids to
their current blob, voice reference, and registration time. Index writes are
atomic (tmp + rename), so a crash mid-write never loses prior profiles.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from pathlib import Path

from txt2vid.wire.payloads import SessionProfile


class ProfileStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.blobs = self.root / "blobs"
        self.blobs.mkdir(parents=True, exist_ok=True)
        self.index_path = self.root / "index.json"
        self._index: dict[str, dict] = {}
        if self.index_path.exists():
            self._index = json.loads(self.index_path.read_text("utf-8"))

    def known_ids(self) -> set[int]:
        return {int(uid) for uid in self._index}

    def put(self, profile: SessionProfile) -> bool:
        """Store a profile; returns True when it replaced an existing one."""
        digest = hashlib.sha256(profile.driving_video).hexdigest()
        blob_path = self.blobs / digest
        if not blob_path.exists():
            tmp = blob_path.with_suffix(".tmp")
            tmp.write_bytes(profile.driving_video)
            os.replace(tmp, blob_path)
        replaced = str(profile.user_id) in self._index
        self._index[str(profile.user_id)] = {
            "blob": digest,
            "voice_profile_ref": profile.voice_profile_ref,
            "container_tag": profile.container_tag.decode("latin-1"),
            "registered_at": time.time(),
        }
        self._flush()
        return replaced

    def get(self, user_id: int) -> SessionProfile | None:
        entry = self._index.get(str(user_id))
        if entry is None:
            return None
        blob = (self.blobs / entry["blob"]).read_bytes()
        return SessionProfile(
            user_id=user_id,
            voice_profile_ref=entry["voice_profile_ref"],
            container_tag=entry["container_tag"].encode("latin-1"),
            driving_video=blob,
        )

    def _flush(self) -> None:
        tmp = self.index_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(self._index, indent=2), "utf-8")
        os.replace(tmp, self.index_path)
