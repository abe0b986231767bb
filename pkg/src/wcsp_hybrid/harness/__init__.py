"""Instance files, random instances, replicate campaigns and reports."""
