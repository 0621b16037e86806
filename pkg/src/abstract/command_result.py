from typing import Any, TypedDict


class CommandResult(TypedDict):
    exit_code: int
    human_text: str
    machine_payload: dict[str, Any] | None
