from .csv_generator import CSVReportGenerator, ResultRow, CurveRow, RESULT_HEADER, CURVE_HEADER

__all__ = [
    'CSVReportGenerator',
    'ResultRow',
    'CurveRow',
    'RESULT_HEADER',
    'CURVE_HEADER'
]
