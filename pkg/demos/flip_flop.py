"""Compile the two-layer Flip-Flop model, print its predictions on one word, then verify it."""

from ssmlang import RandomWords, check_equivalence, compile_flip_flop, get_language, run_model

model = compile_flip_flop()
print(f"{model.name}: {len(model.layers)} layers, widths {[layer.d for layer in model.layers]}")

word = "w 1 i 0 i 1 r".split()
for t, (symbol, label) in enumerate(zip(word, run_model(model, word)), start=1):
    print(f"t={t} read {symbol!r:4} next symbols {sorted(label)}")

spec = get_language("flipflop")
for mode in ("id", "sparse"):
    report = check_equivalence(model, spec, RandomWords(500, (1, 500), seed=0, mode=mode))
    print(f"{mode:6} mix: {report.checked} words, {report.mismatch_count} mismatches")
