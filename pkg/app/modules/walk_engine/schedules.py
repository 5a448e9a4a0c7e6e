"""Validation of special-vertex schedules"""
from app.core.exceptions import ConfigError, ScheduleError
from app.modules.graph_model.models import GraphTopology
from app.modules.walk_engine.models import ScheduleForm, ScheduleSpec

# kernel codes
SCHEDULE_NONE = 0
SCHEDULE_AFFINE = 1
SCHEDULE_TABLE = 2
SCHEDULE_ADAPTIVE = 3

_FORM_CODES = {
    ScheduleForm.AFFINE: SCHEDULE_AFFINE,
    ScheduleForm.TABLE: SCHEDULE_TABLE,
    ScheduleForm.ADAPTIVE: SCHEDULE_ADAPTIVE,
}


def schedule_code(schedule: ScheduleSpec | None) -> int:
    return SCHEDULE_NONE if schedule is None else _FORM_CODES[schedule.form]


def check_increment(k: int, value: int, previous: int) -> None:
    """
    Enforce H(1) >= 1 and H(k+1) >= H(k) + 1.

    ``previous`` is H(k-1), or 0 for the first visit.

    Raises:
        ScheduleError: the value breaks either condition
    """
    if value < previous + 1:
        if k == 1:
            raise ScheduleError(f"schedule needs H(1) >= 1, got H(1)={value}", k)
        raise ScheduleError(
            f"schedule violates H(k) >= H(k-1) + 1 at k={k}: H({k})={value}, H({k - 1})={previous}",
            k,
        )


def validate_schedule(g: GraphTopology, schedule: ScheduleSpec) -> int:
    """
    Check a schedule eagerly where its values are known up front.

    Adaptive schedules are checked at every special visit instead.

    Returns:
        index of the special vertex

    Raises:
        ConfigError: special vertex is a leaf or not in the graph
        ScheduleError: affine or table values break the increment rule
    """
    special = g.index_of(schedule.special)
    if schedule.special.is_leaf:
        raise ConfigError(f"special vertex must be interior, got {schedule.special.label}")

    if schedule.form == ScheduleForm.AFFINE:
        if schedule.c < 1:
            raise ScheduleError(f"affine schedule needs slope c >= 1, got c={schedule.c}")
        check_increment(1, schedule.value(1), 0)
    elif schedule.form == ScheduleForm.TABLE:
        if not schedule.table:
            raise ScheduleError("table schedule is empty")
        previous = 0
        for k, value in enumerate(schedule.table, start=1):
            check_increment(k, int(value), previous)
            previous = int(value)
    elif schedule.hook is None or not callable(schedule.hook):
        raise ScheduleError("adaptive schedule needs a callable hook(state, k)")
    return special
