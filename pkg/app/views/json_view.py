"""
JSON View
Formats command results and errors as JSON documents
"""

import json
from typing import Any, Dict, Optional

from ..utils.helpers import get_current_timestamp


class JsonView:
    """JSON response formatter"""

    @staticmethod
    def success(command: str, data: Any = None, config_hash: Optional[str] = None) -> Dict:
        """Format success response"""
        return {
            "status": "success",
            "command": command,
            "config_hash": config_hash,
            "data": data,
            "timestamp": get_current_timestamp(),
        }

    @staticmethod
    def error(code: str, message: str, details: Optional[str] = None) -> Dict:
        """Format error response"""
        return {
            "error": True,
            "code": code,
            "message": message,
            "details": details,
            "timestamp": get_current_timestamp(),
        }

    @staticmethod
    def dumps(document: Dict) -> str:
        return json.dumps(document, indent=2, default=str)
