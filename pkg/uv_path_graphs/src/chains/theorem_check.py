import logging
import time
from typing import Callable, Dict, List, Optional

from langchain.chains.base import Chain
from pydantic import ConfigDict, PrivateAttr

from uv_path_graphs.src.errors import EnumerationLimitError
from uv_path_graphs.src.theorems import THEOREM_CHECKS, CheckOptions

# Set up a logger for the chain
logger = logging.getLogger(__name__)


class TheoremCheckChain(Chain):
    """
    Chain that runs one theorem check on one corpus instance.

    Purpose
    -------
    - Takes a theorem id and an `Instance`.
    - Looks the check up in `THEOREM_CHECKS` (or the `checks` mapping given at init)
      and runs it with the chain's `CheckOptions`.
    - Returns the `TheoremReport` with its duration filled in, or `None` when the
      instance was skipped (an enumeration guard tripped, or the instance does not
      qualify for the theorem).

    Attributes
    ----------
    input_keys : List[str]
        Expected input keys: `["theorem", "instance"]`.
    output_keys : List[str]
        Returned output keys: `["theorem", "index", "report"]`.
    """

    # Use ConfigDict to ignore fields not defined in the class
    model_config = ConfigDict(extra="ignore")

    # Use PrivateAttr so the options and check table are not part of the Pydantic model
    _options: CheckOptions = PrivateAttr()
    _checks: Dict[str, Callable] = PrivateAttr()

    @property
    def input_keys(self) -> List[str]:
        return ["theorem", "instance"]

    @property
    def output_keys(self) -> List[str]:
        return ["theorem", "index", "report"]

    def __init__(self,
                 options: Optional[CheckOptions] = None,
                 checks: Optional[Dict[str, Callable]] = None,
                 **kwargs
                 ):
        """
        Initializes the chain with the options every check receives.
        """
        super().__init__(**kwargs)
        self._options = options or CheckOptions()
        self._checks = checks if checks is not None else THEOREM_CHECKS
        logger.debug("TheoremCheckChain initialized with seed=%d.", self._options.seed)

    def _call(self, inputs: Dict) -> Dict:
        theorem = inputs["theorem"]
        instance = inputs["instance"]

        check = self._checks.get(theorem)
        if check is None:
            raise KeyError(f"unknown theorem id {theorem!r}")

        logger.debug("Checking %s on instance %d (%s)", theorem, instance.index, instance.source)
        started = time.perf_counter()
        try:
            report = check(instance, self._options)
        except EnumerationLimitError as e:
            logger.warning("%s skips instance %d: %s", theorem, instance.index, e)
            report = None
        except Exception as e:
            logger.error("Error checking %s on instance %d: %s", theorem, instance.index, e, exc_info=True)
            raise

        if report is not None:
            report = report.model_copy(update={"duration": round(time.perf_counter() - started, 6)})

        return {
            "theorem": theorem,
            "index": instance.index,
            "report": report,
        }
