"""Python bindings for the phrprobe analysis core."""

from ._core import (  # noqa: F401
    Dump,
    ManifestEntry,
    PhrprobeError,
    SequenceRecord,
    analyze,
    cosine,
    is_abba,
    load_bird,
    pearson,
    pool,
    read_dump,
    train_probe,
    validate_dump,
    validate_dump_file,
    word_overlap,
    write_dump,
)

__version__ = "0.1.0"
