"""Text rendering of episode traces over grid-layout tables.

Promo-grid tables (width 10, 4 actions) get day-of-week column headers
and named actions; anything else falls back to numeric columns and
action indices. Each frame shows the grid after the step, the action
taken, its reward, and the running total. A terminating step with
positive reward is the successful forecast and gets flagged.
"""

from __future__ import annotations

from .errors import NoLayout, StateOutOfRange
from .learner import EpisodeTrace
from .promoenv import ACTION_NAMES, GRID_WIDTH, N_ACTIONS
from .tables import TransitionTable

DAY_HEADERS = ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun", "A7", "A8", "A9"]
_CELL_W = 4


def render_trace(trace: EpisodeTrace, table: TransitionTable) -> str:
    """Render every frame of an episode; header only for an empty trace."""
    if table.layout is None:
        raise NoLayout("table registered without renderable geometry")
    rows, width = table.layout
    promo_style = width == GRID_WIDTH and table.n_actions == N_ACTIONS
    goals = table.goal_states()

    lines = [_header(width, promo_style)]
    if not trace.steps:
        return "\n".join(lines)

    start = trace.steps[0].state
    _check_state(start, table)
    lines.append(f"start  state={start} (row {start // width}, col {start % width})")
    lines.append(_grid(rows, width, start, goals))

    for i, step in enumerate(trace.steps):
        _check_state(step.next_state, table)
        if promo_style:
            action = ACTION_NAMES.get(step.action, str(step.action))
        else:
            action = str(step.action)
        note = f"step {i + 1}: {action}  reward={step.reward:g}  " \
               f"total={trace.cumulative[i]:g}"
        if step.done and step.reward > 0:
            note += "  FORECAST ✓"
        lines.append(note)
        lines.append(_grid(rows, width, step.next_state, goals))
    return "\n".join(lines)


def _header(width: int, promo_style: bool) -> str:
    if promo_style:
        names = DAY_HEADERS[:width]
    else:
        names = [str(c) for c in range(width)]
    return "".join(name.ljust(_CELL_W) for name in names).rstrip()


def _grid(rows: int, width: int, mark: int, goals: set[int]) -> str:
    out = []
    for r in range(rows):
        cells = []
        for c in range(width):
            s = r * width + c
            char = "@" if s == mark else ("G" if s in goals else ".")
            cells.append(char.ljust(_CELL_W))
        out.append("".join(cells).rstrip())
    return "\n".join(out)


def _check_state(state: int, table: TransitionTable) -> None:
    if not (0 <= state < table.n_states):
        raise StateOutOfRange(
            f"trace references state {state}, table has 0..{table.n_states - 1}"
        )
