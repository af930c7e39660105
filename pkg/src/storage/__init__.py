"""Artifact file formats"""
