"""Utility modules for the layered-state toolkit"""
