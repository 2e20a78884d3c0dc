"""Regenerate src/carve/_ttable.py.

Developer tool, not part of the package: freezes two-sided Student-t
critical values so the installed package needs no stats dependency.
Requires scipy. Run from the repository root:

    python3 tools/gen_t_table.py
"""

import pathlib

from scipy import stats

LEVELS = (0.90, 0.95, 0.99)
MAX_DF = 200

HEADER = '''"""Frozen two-sided Student-t critical values.

Generated by tools/gen_t_table.py (scipy), not hand-edited. Keys are
two-sided confidence levels; index i holds the critical value for
i + 1 degrees of freedom, i.e. the (1 + level) / 2 quantile of the t
distribution. Beyond {max_df} degrees of freedom the normal quantile
is an adequate stand-in (relative error < 2e-3 at df = {max_df}).
"""

MAX_DF = {max_df}

NORMAL_CRITICAL = {{
{normal_rows}}}

T_CRITICAL = {{
{table_rows}}}
'''


def main() -> None:
    normal_rows = "".join(
        f"    {level!r}: {float(stats.norm.ppf((1 + level) / 2))!r},\n" for level in LEVELS
    )
    table_rows = ""
    for level in LEVELS:
        q = (1 + level) / 2
        vals = [float(stats.t.ppf(q, df)) for df in range(1, MAX_DF + 1)]
        table_rows += f"    {level!r}: (\n"
        for i in range(0, MAX_DF, 4):
            chunk = ", ".join(repr(v) for v in vals[i:i + 4])
            table_rows += f"        {chunk},\n"
        table_rows += "    ),\n"
    out = HEADER.format(max_df=MAX_DF, normal_rows=normal_rows, table_rows=table_rows)
    target = pathlib.Path(__file__).resolve().parents[1] / "src" / "carve" / "_ttable.py"
    target.write_text(out, encoding="utf-8")
    print(f"wrote {target}")


if __name__ == "__main__":
    main()
