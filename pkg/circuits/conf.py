from django.conf import settings


def setting(name, default):
    """
    Read a simulator tunable from Django settings.

    The simulator is also used outside a configured Django process (plain
    scripts, worker processes before setup), so an unconfigured settings
    object falls back to the given default instead of raising.
    """
    if not settings.configured:
        return default
    return getattr(settings, name, default)


def gate_delay():
    return setting('SIM_GATE_DELAY_PS', 100)


def livelock_bound():
    return setting('SIM_LIVELOCK_BOUND', 1_000_000)


def supply_mv():
    return setting('SIM_SUPPLY_MV', 1800)


def settle_window():
    return setting('SIM_SETTLE_WINDOW_PS', 200_000)
