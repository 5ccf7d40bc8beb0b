"""Reproduce all published comparison tables and summarize the grading.

Equivalent to running `ruinbounds table ID` for every id; cells flagged
DISCREPANCY-DOCUMENTED are established misprints in the source, carried
with both the computed and the printed value.
"""

from ruinbounds import tables

total = {"MATCH": 0, "DISCREPANCY-DOCUMENTED": 0, "MISMATCH": 0}
for tid in tables.TABLE_IDS:
    result = tables.run_table(tid)
    counts = {}
    for row in result.rows:
        counts[row.flag] = counts.get(row.flag, 0) + 1
        total[row.flag] += 1
    worst = max((r for r in result.rows if r.flag == "MATCH"),
                key=lambda r: r.deviation)
    print(f"table {tid:2}: {counts.get('MATCH', 0):3d} match, "
          f"{counts.get('DISCREPANCY-DOCUMENTED', 0)} documented"
          f"   worst matched deviation {worst.deviation:.2e}")
    for row in result.rows:
        if row.flag == "DISCREPANCY-DOCUMENTED":
            print(f"    documented: {row.inputs} {row.quantity} "
                  f"computed {row.computed:.7g} vs printed {row.paper:.7g}")

print(f"\ntotals: {total}")
