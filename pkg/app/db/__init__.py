from .storage import (
    RunStore,
    format_value,
    read_manifest,
    read_snapshot_binary,
    read_snapshot_csv,
    read_table,
    write_snapshot_binary,
    write_snapshot_csv,
    write_table,
)

__all__ = [
    "RunStore",
    "format_value",
    "read_manifest",
    "read_snapshot_binary",
    "read_snapshot_csv",
    "read_table",
    "write_snapshot_binary",
    "write_snapshot_csv",
    "write_table",
]
