from rest_framework.views import exception_handler
from rest_framework.response import Response
from rest_framework import status
import logging

from circuits.exceptions import SimulationError

logger = logging.getLogger(__name__)


def custom_exception_handler(exc, context):
    """
    Custom exception handler for REST framework that improves error responses.

    Returns standardized error responses with appropriate status codes.
    Simulator errors that escape a view are reported as bad requests instead
    of opaque server errors.
    """
    # Call REST framework's default exception handler first
    response = exception_handler(exc, context)

    if response is None:
        if isinstance(exc, SimulationError):
            logger.warning(f"Simulation error in API request: {exc}")
            return Response(
                {"error": "Simulation error", "detail": str(exc), "status_code": 400},
                status=status.HTTP_400_BAD_REQUEST
            )

        # Log unhandled exceptions for debugging
        logger.error(f"Unhandled exception: {exc}")
        return Response(
            {"error": "Server error", "detail": str(exc), "status_code": 500},
            status=status.HTTP_500_INTERNAL_SERVER_ERROR
        )

    # Enhance validation error responses
    if response.status_code == 400:
        response.data = {
            "error": "Bad request",
            "detail": response.data,
            "status_code": response.status_code
        }

    # Enhance not found responses
    elif response.status_code == 404:
        response.data = {
            "error": "Not found",
            "detail": response.data.get("detail", "The requested resource was not found."),
            "status_code": response.status_code
        }

    # Method not allowed on the read-only API
    elif response.status_code == 405:
        response.data = {
            "error": "Method not allowed",
            "detail": response.data.get("detail", "This endpoint is read-only."),
            "status_code": response.status_code
        }

    # Add status code to all responses for consistency
    elif isinstance(response.data, dict):
        response.data['status_code'] = response.status_code

    return response
