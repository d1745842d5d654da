# Fixed points of the limiting payoff-sampling polynomial P(2X - Y < k) and
# how they compare with the printed three-decimal tables.
from hawkdove.experiments import cross_table, format_tables, limit_table, table_entries

for k, p, slope in limit_table():
    tag = "stable" if slope < 1 else "unstable"
    print(f"k={k:2d}  p={p:.5f}  |w'|={slope:.5f}  {tag}")

print(cross_table().round(4))
print(format_tables(table_entries()))
