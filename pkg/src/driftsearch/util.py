import json
import os
import tempfile
from pathlib import Path


def atomic_write_text(path, text: str):
    """Write via a temp file in the same directory, then rename into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def ndjson(records) -> str:
    return "".join(json.dumps(r, separators=(",", ":")) + "\n" for r in records)


def num(x) -> str:
    """Shortest round-tripping decimal for a float (numpy scalars included)."""
    return repr(float(x))


def field_csv(field) -> str:
    lines = ["x_km,y_km,value"]
    lines += [f"{num(x)},{num(y)},{num(v)}" for x, y, v in field.to_rows()]
    return "\n".join(lines) + "\n"
