import hashlib
import json
import os

from .io import read_json, write_json


def content_key(*parts):
    """Stable hex key over JSON-serializable parts."""
    payload = json.dumps(list(parts), sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha1(payload.encode("utf-8")).hexdigest()


class JsonCache:
    """One JSON file per key. Writes are atomic renames, so the last writer of a key wins."""

    def __init__(self, directory):
        self.directory = directory
        os.makedirs(directory, exist_ok=True)

    def path(self, key):
        return os.path.join(self.directory, f"{key}.json")

    def get(self, key):
        path = self.path(key)
        if not os.path.exists(path):
            return None
        try:
            return read_json(path)
        except json.JSONDecodeError:
            return None

    def put(self, key, record):
        write_json(self.path(key), record)

    def delete(self, key):
        path = self.path(key)
        if os.path.exists(path):
            os.remove(path)

    def __contains__(self, key):
        return os.path.exists(self.path(key))

    def keys(self):
        return sorted(name[:-5] for name in os.listdir(self.directory) if name.endswith(".json"))
