import json
import os
import tempfile
from functools import partial

import jsonlines

dumps_sorted = partial(json.dumps, sort_keys=True, ensure_ascii=False)


def atomic_write_bytes(path, data):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def atomic_write_text(path, text):
    atomic_write_bytes(path, text.encode("utf-8"))


def write_json(path, obj, indent=2):
    atomic_write_text(path, json.dumps(obj, sort_keys=True, ensure_ascii=False, indent=indent) + "\n")


def read_json(path):
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def read_jsonl(path):
    with jsonlines.open(path, "r") as reader:
        return [obj for obj in reader]


def write_jsonl(path, rows):
    """Whole-file JSONL write with sorted keys, so equal rows give equal bytes."""
    lines = [dumps_sorted(row) for row in rows]
    atomic_write_text(path, "".join(line + "\n" for line in lines))


def append_jsonl(path, row):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with jsonlines.open(path, "a", dumps=dumps_sorted) as writer:
        writer.write(row)
