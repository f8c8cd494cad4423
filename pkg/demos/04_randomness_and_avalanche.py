"""Statistical quality of the ciphertext: randomness battery and avalanche.

Encrypts batches of 4000-bit messages under fresh order-16 keys and
400-bit IVs, runs the randomness battery on the ciphertexts, then
measures how a single flipped bit of plaintext, IV, or key diffuses.
Scaled down for a quick run; raise the counts for report-grade numbers.
"""

from sebq.analysis import (
    aggregate_pass_rates,
    avalanche_experiment,
    ciphertext_suite_experiment,
    frequency_test,
    runs_test,
)

import numpy as np

# --- the battery on obviously bad inputs first ---------------------------------
zeros = np.zeros(4000, dtype=np.uint8)
alternating = np.tile([0, 1], 2000).astype(np.uint8)
print("all-zeros frequency p-value   :", f"{frequency_test(zeros).p_value:.2e}")
print("alternating frequency p-value :", f"{frequency_test(alternating).p_value:.3f}")
print("alternating runs p-value      :", f"{runs_test(alternating).p_value:.2e}")
print("(balanced is not the same as random)")

# --- ciphertext randomness -------------------------------------------------------
SEQUENCES = 30  # report-grade runs use 100
print(f"\nbattery over {SEQUENCES} ciphertexts per plaintext class "
      "(order-16 keys, 400-bit IVs, 4000-bit messages)")
for kind in ("random", "zeros", "ones"):
    per_seq = ciphertext_suite_experiment(sequences=SEQUENCES, plaintext=kind, seed=17)
    agg = aggregate_pass_rates(per_seq)
    line = ", ".join(f"{name} {slot['success_pct']:.0f}%" for name, slot in agg.items())
    print(f"  {kind:6s}: {line}")

# --- avalanche -------------------------------------------------------------------
print("\navalanche: percent of ciphertext bits changed per single flip")
for target in ("plaintext", "iv", "key"):
    report = avalanche_experiment(
        target, positions=range(10), experiments=3, seed=23,
    )
    print(f"  {report}")
print("all three hover around the ideal 50%: one flipped input bit")
print("rewrites about half the ciphertext")
