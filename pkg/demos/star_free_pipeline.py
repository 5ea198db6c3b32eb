"""Classify the regular catalog, decompose one star-free DFA and compile it into a layer stack."""

from ssmlang import (
    Exhaustive,
    NotStarFree,
    check_equivalence,
    compile_star_free,
    get_language,
    is_aperiodic,
    krohn_rhodes_decompose,
    minimize_dfa,
)
from ssmlang.languages import REGULAR_CATALOG

for name in REGULAR_CATALOG:
    minimal = minimize_dfa(get_language(name).dfa)
    verdict = "star-free" if is_aperiodic(minimal) else "not star-free"
    print(f"{name:9} {minimal.n_states:2} states  {verdict}")

spec = get_language("tomita4")
program = krohn_rhodes_decompose(minimize_dfa(spec.dfa))
print(f"\n{spec.name}: {len(program.components)} set-reset components")
print(program.to_text())

model = compile_star_free(spec.dfa)
report = check_equivalence(model, spec, Exhaustive(10))
print(f"{len(model.layers)} layers, nonnegative gates: {model.nonnegative}, "
      f"{report.checked} prefixes checked, {report.mismatch_count} mismatches")

try:
    compile_star_free(get_language("parity").dfa)
except NotStarFree as exc:
    print(f"parity refused: {exc}")
