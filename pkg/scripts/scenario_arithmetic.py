"""Recompute the five-scenario accuracy table from correct/total counts.

Only the per-scenario totals are published, so no confusion matrix is shown.
"""

from ovoscope.evaluation import Scenario, mean_accuracy, percent_str

# correct detections out of 10, 20, ..., 50 test eggs
COUNTS = [(10, 9), (20, 17), (30, 25), (40, 33), (50, 41)]

scenarios = [Scenario(n, k) for n, k in COUNTS]
print(f"{'Number of Data':>14}  {'Detection':>9}  {'Accuracy (%)':>12}")
for s in scenarios:
    print(f"{s.n:>14}  {s.correct:>9}  {percent_str(s.accuracy) + '%':>12}")
# the published average uses the rounded row values
rounded = [float(percent_str(s.accuracy)) for s in scenarios]
print(f"{'Average of accuracy':<27}{percent_str(mean_accuracy(rounded)) + '%':>12}")
print(f"{'(unrounded rows)':<27}{percent_str(mean_accuracy([s.accuracy for s in scenarios])) + '%':>12}")
