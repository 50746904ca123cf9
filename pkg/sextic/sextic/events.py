import json
import time
from pathlib import Path
from uuid import uuid4


def append_jsonl(path: Path, record: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("a", encoding="utf-8") as f:
        f.write(json.dumps(record, ensure_ascii=True) + "\n")
        f.flush()


def run_record(command: str, argument: str, started: float, exit_code: int, **extra) -> dict:
    return {
        "event_id": str(uuid4()),
        "ts_unix": time.time(),
        "command": command,
        "argument": argument,
        "exit_code": exit_code,
        "latency_ms": round((time.perf_counter() - started) * 1000, 3),
        **extra,
    }
