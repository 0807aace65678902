# Generated by Django 5.2.6 on 2026-10-17 14:40

from django.db import migrations, models


class Migration(migrations.Migration):

    dependencies = [
        ("census", "0001_initial"),
    ]

    operations = [
        migrations.AddField(
            model_name="censusrecord",
            name="params",
            field=models.JSONField(blank=True, default=dict),
        ),
    ]
