from ._ultraperc import *  # noqa: F401,F403
