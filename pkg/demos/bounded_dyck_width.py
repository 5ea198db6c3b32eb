"""Width of the two-layer bounded-depth Dyck model over a (K, h) sweep, as CSV."""

import math

from ssmlang import RandomWords, check_equivalence, compile_bounded_dyck, get_language

print("K,h,h_log2K,width,bound")
for K, h in ((2, 2), (4, 5), (8, 10), (16, 20), (32, 8)):
    model = compile_bounded_dyck(K, h)
    bound = 2 * (2 * h + 1) + h * (1 + math.ceil(math.log2(2 * K)))
    print(f"{K},{h},{h * math.ceil(math.log2(K))},{model.width},{bound}")

spec = get_language("bdyck", K=3, h=4)
report = check_equivalence(compile_bounded_dyck(3, 4), spec, RandomWords(200, (100, 300), seed=0))
print(f"# Dyck(3,4): {report.checked} words, {report.mismatch_count} mismatches")
