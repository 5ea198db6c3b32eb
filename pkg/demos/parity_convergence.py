"""Nonnegative models settle on 1^N; sign and rotation gates keep oscillating."""

import random

from ssmlang import (
    compile_flip_flop,
    compile_parity_signed,
    parity_convergence_demo,
    random_nonneg_model,
    recognize,
)
from ssmlang.compiler import compile_mod_counter
from ssmlang.verify import parity_falsification_search

record = parity_convergence_demo(compile_flip_flop(), n=2000)
print(f"flip-flop on {record.pattern}: stationary from step {record.stationarity_step}")

rng = random.Random(0)
for seed in range(10):
    model = random_nonneg_model(seed, rng.randint(1, 3), rng.randint(2, 8))
    record = parity_convergence_demo(model, n=2000)
    search = parity_falsification_search(model, exhaustive_len=8, random_count=100)
    print(f"{model.name:24} stationary from {record.stationarity_step}, "
          f"falsified: {search.falsified}")

signed = compile_parity_signed()
mod2 = compile_mod_counter(2, {"1"})
print("n      " + " ".join(f"{n:>2}" for n in range(1, 9)))
for label, model in (("signed", signed), ("mod-2", mod2)):
    row = " ".join(f"{int(recognize(model, '1' * n)):>2}" for n in range(1, 9))
    print(f"{label:6} {row}")
