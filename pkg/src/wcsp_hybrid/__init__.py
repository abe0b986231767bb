"""Bucket elimination, mini-buckets, beam search and memetic hybrids for weighted CSPs."""
