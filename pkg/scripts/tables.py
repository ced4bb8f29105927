"""Print the four separability tables from classify and the diff against the stored cells."""
from sepcones.separability import render_table, table_diff
from sepcones.separability.classify import SPACES

for space in SPACES:
    print(render_table(space))
    print()
d = table_diff()
print("diff:", "empty" if not d else "\n  " + "\n  ".join(d))
