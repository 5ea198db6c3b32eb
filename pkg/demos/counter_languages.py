"""Compile the counter languages, show a^nb^nc^n predictions, and save/load a model."""

import tempfile
from pathlib import Path

from ssmlang import (
    RandomWords,
    check_equivalence,
    compile_language,
    get_language,
    load_model,
    run_model,
    save_model,
)
from ssmlang.compiler import counter_assignment
from ssmlang.languages import COUNTER_CATALOG

spec = get_language("anbncn")
print("increments:", counter_assignment(spec))
model = compile_language("anbncn")
for symbol, label in zip("aabbcc", run_model(model, "aabbcc")):
    print(f"  read {symbol} -> {sorted(label)}")

for name in COUNTER_CATALOG:
    report = check_equivalence(compile_language(name), get_language(name),
                               RandomWords(200, (101, 150), seed=0))
    print(f"{name:9} {report.checked} words in [101, 150], {report.mismatch_count} mismatches")

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "dyck1.json"
    original = compile_language("dyck1")
    save_model(original, path)
    word = list("(()(()))")
    print("round trip identical:", run_model(load_model(path), word) == run_model(original, word))
